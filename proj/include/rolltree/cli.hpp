#pragma once

namespace rolltree {

int run_cli(int argc, const char* const* argv);

}  // namespace rolltree
