//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file brwlab/cli.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace brwlab
{
//---------------------------------------------------------------------------//
namespace exit_code
{
inline constexpr int ok = 0;
inline constexpr int config_error = 1;
inline constexpr int budget_error = 2;
}  // namespace exit_code

// Command-line entry point; args excludes the program name
int run_cli(std::vector<std::string> const& args,
            std::ostream& out,
            std::ostream& err);

int run_cli(int argc, char const* const* argv);

//---------------------------------------------------------------------------//
}  // namespace brwlab
