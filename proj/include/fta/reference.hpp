#pragma once

#include "fta/hash.hpp"
#include "fta/projection.hpp"

namespace fta {

/// Deliberately naive encoder used to cross-check the production path: for
/// every group it rescans the raw score matrix from scratch — no shared
/// first-act table, no reuse — following the definitions one comparison at a
/// time. Slow on purpose; exists only as an independent witness for tests
/// and the `verify` command.
FtaCode encode_by_rescan(const HashSpec& spec, const ScoreMatrix& scores);

}  // namespace fta
