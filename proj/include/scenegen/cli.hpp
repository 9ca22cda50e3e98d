#pragma once

namespace scenegen::cli {

// Entry point behind the scenegen binary; returns the process exit status.
// Subcommands: learn, sample, render, eval, plan-debug.
int run(int argc, const char* const* argv);

}  // namespace scenegen::cli
