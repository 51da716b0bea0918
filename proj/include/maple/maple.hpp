#pragma once

#include "maple/augmentation.hpp"
#include "maple/error.hpp"
#include "maple/extraction.hpp"
#include "maple/graver.hpp"
#include "maple/hnf.hpp"
#include "maple/integer_matrix.hpp"
#include "maple/io.hpp"
#include "maple/lll.hpp"
#include "maple/parallel.hpp"
#include "maple/problem.hpp"
#include "maple/rational_solve.hpp"
