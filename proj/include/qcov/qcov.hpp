#pragma once

// Everything in one include.

#include "qcov/core.hpp"
#include "qcov/grid.hpp"
#include "qcov/fourier.hpp"
#include "qcov/operators.hpp"
#include "qcov/states.hpp"
#include "qcov/spin.hpp"
#include "qcov/galilei.hpp"
#include "qcov/uniqueness.hpp"
#include "qcov/circle.hpp"
#include "qcov/io.hpp"
