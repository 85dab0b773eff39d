#ifndef INVLOC_INVLOC_HPP
#define INVLOC_INVLOC_HPP

#include "invloc/core.hpp"
#include "invloc/forward.hpp"
#include "invloc/inverse.hpp"
#include "invloc/io.hpp"
#include "invloc/linprog.hpp"
#include "invloc/subproblem.hpp"

#endif  // INVLOC_INVLOC_HPP
