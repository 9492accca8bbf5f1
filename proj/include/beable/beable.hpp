#pragma once

#include "beable/beables.hpp"
#include "beable/error.hpp"
#include "beable/hermitian.hpp"
#include "beable/joint_diag.hpp"
#include "beable/random.hpp"
#include "beable/segalgebra.hpp"
#include "beable/spectral.hpp"
#include "beable/states.hpp"
#include "beable/subspace.hpp"
#include "beable/tolerances.hpp"
#include "beable/spin.hpp"
#include "beable/theorems.hpp"
