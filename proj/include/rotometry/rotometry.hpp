#ifndef ROTOMETRY_ROTOMETRY_HPP
#define ROTOMETRY_ROTOMETRY_HPP

#include "rotometry/dynamics.hpp"
#include "rotometry/errors.hpp"
#include "rotometry/fock_basis.hpp"
#include "rotometry/io.hpp"
#include "rotometry/metrology.hpp"
#include "rotometry/models.hpp"
#include "rotometry/operators.hpp"
#include "rotometry/parallel.hpp"
#include "rotometry/spectral.hpp"
#include "rotometry/states.hpp"
#include "rotometry/version.hpp"

#endif  // ROTOMETRY_ROTOMETRY_HPP
