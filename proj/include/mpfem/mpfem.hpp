#ifndef MPFEM_MPFEM_HPP
#define MPFEM_MPFEM_HPP

#include "mpfem/elements.hpp"
#include "mpfem/harness.hpp"
#include "mpfem/maxplus.hpp"
#include "mpfem/problems.hpp"
#include "mpfem/semimodule.hpp"
#include "mpfem/solver.hpp"

#endif  // MPFEM_MPFEM_HPP
