#pragma once

// Umbrella header: the full simulation suite in dependency order.

#include "errors.hpp"
#include "grid.hpp"
#include "field.hpp"
#include "fft.hpp"
#include "spectral.hpp"
#include "state.hpp"
#include "poisson.hpp"
#include "quantum.hpp"
#include "diagnostics.hpp"
#include "qnsp.hpp"
#include "qdd.hpp"
#include "relaxation.hpp"
#include "initial.hpp"
#include "checkpoint.hpp"
#include "config.hpp"
#include "series.hpp"
#include "plot.hpp"
#include "verify.hpp"
