#pragma once

namespace hiter {

// Entry point behind the `hiter` binary; also callable from tests.
// Exit codes: 0 all checks passed, 1 a check failed or was inconclusive,
// 2 usage / configuration error.
int cli_main(int argc, char** argv);

} // namespace hiter
