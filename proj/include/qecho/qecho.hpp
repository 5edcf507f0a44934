#pragma once

// Umbrella header: photon-echo reference simulation plus the bilinear
// Koopman surrogate pipeline (training, prediction, metrics, experiments).

#include "qecho/config.hpp"
#include "qecho/constants.hpp"
#include "qecho/detuning.hpp"
#include "qecho/ensemble.hpp"
#include "qecho/errors.hpp"
#include "qecho/experiments.hpp"
#include "qecho/format.hpp"
#include "qecho/lift.hpp"
#include "qecho/metrics.hpp"
#include "qecho/model.hpp"
#include "qecho/model_io.hpp"
#include "qecho/parallel.hpp"
#include "qecho/pinv.hpp"
#include "qecho/polarization.hpp"
#include "qecho/predict.hpp"
#include "qecho/pulse.hpp"
#include "qecho/rk4.hpp"
#include "qecho/rk45.hpp"
#include "qecho/time_grid.hpp"
#include "qecho/tls_state.hpp"
#include "qecho/trace_io.hpp"
#include "qecho/training.hpp"
