#pragma once

#include "toepcov/bounds.hpp"
#include "toepcov/error.hpp"
#include "toepcov/estimators.hpp"
#include "toepcov/harness.hpp"
#include "toepcov/io.hpp"
#include "toepcov/masks.hpp"
#include "toepcov/models.hpp"
#include "toepcov/rng.hpp"
#include "toepcov/sampling.hpp"
#include "toepcov/svg_plot.hpp"
#include "toepcov/toeplitz.hpp"
