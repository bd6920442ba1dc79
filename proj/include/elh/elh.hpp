#pragma once

// Umbrella header.

#include "coefficients.hpp"
#include "common.hpp"
#include "config.hpp"
#include "constitutive.hpp"
#include "diagnostics.hpp"
#include "dynamics.hpp"
#include "fft.hpp"
#include "field.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "rng.hpp"
#include "runner.hpp"
#include "spectral.hpp"
