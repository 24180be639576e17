//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file brwlab/errors.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <stdexcept>
#include <string>

namespace brwlab
{
//---------------------------------------------------------------------------//
//! Moment or transform diverges at the requested argument
struct DomainError : std::domain_error
{
    using std::domain_error::domain_error;
};

//! Root finder found no sign change on its scan domain
struct NoRootError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

//! Model is degenerate for the requested reduction (zero variance etc.)
struct DegenerateError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

//! Model fails the hypotheses required by an operation
struct AdmissibilityError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

//! Invalid model construction or configuration
struct ConfigError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

//! Resource cap hit (particle count, enumeration size)
struct BudgetError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

//---------------------------------------------------------------------------//
}  // namespace brwlab
