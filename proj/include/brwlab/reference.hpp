//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file brwlab/reference.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <string>
#include <vector>

#include "model.hpp"

namespace brwlab
{
namespace reference
{
//---------------------------------------------------------------------------//
//! Offspring 1 or 2 with probability 1/2, N(mu, mu) displacements with
//! mu = 2 log 1.5; boundary case, Schroder type with q = 0
PointProcessModel schroder_gaussian();
double schroder_gaussian_gamma();

//! Two atoms with two children each: (1.5, 1.5) w.p. 0.6 and (a, b) w.p.
//! 0.4, with (a, b) solved for the boundary conditions; Bottcher type
PointProcessModel bottcher_two_atom();
double bottcher_two_atom_beta();

//! No children w.p. 1/4, children at (0.2, 1.3) w.p. 3/4; q = 1/3
PointProcessModel quadratic_pgf();
//! quadratic_pgf() reduced to the boundary case
PointProcessModel quadratic_boundary();

//! Two children, each at shift + Exp(rate), reduced to the boundary case
PointProcessModel shifted_exponential();

//! One child at d w.p. p, otherwise two children at (0.5, 1.5);
//! gamma = log(1/p) / d
PointProcessModel pd_family(double p, double d);

//! Registered names for configuration files
std::vector<std::string> names();
PointProcessModel by_name(std::string const& name);

//---------------------------------------------------------------------------//
}  // namespace reference
}  // namespace brwlab
