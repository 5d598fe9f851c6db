#pragma once

#include <iosfwd>

namespace disambig::cli {

// Exit codes: 0 success (an empty report included), 1 the run failed
// (provider, inconsistent examples, unparsable input to fmt), 2 usage or
// configuration error.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace disambig::cli
