#pragma once

#include "lineart/baselayer.hpp"
#include "lineart/bundle.hpp"
#include "lineart/config.hpp"
#include "lineart/curation.hpp"
#include "lineart/haar.hpp"
#include "lineart/linefusion.hpp"
#include "lineart/metrics.hpp"
#include "lineart/morphology.hpp"
#include "lineart/png_io.hpp"
#include "lineart/texsynth.hpp"
#include "lineart/report.hpp"
