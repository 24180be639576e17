//------------------------------- -*- C++ -*- -------------------------------//
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file tools/brwlab.cpp
//---------------------------------------------------------------------------//
#include "brwlab/cli.hpp"

int main(int argc, char** argv)
{
    return brwlab::run_cli(argc, argv);
}
