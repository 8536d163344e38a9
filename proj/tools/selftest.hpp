#pragma once

#include <ostream>

// Runs the built-in oracle suite; returns the number of failed checks.
int run_selftest(std::ostream& out);
