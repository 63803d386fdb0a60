#pragma once

namespace esw {

/// Execution policy for the data-parallel kernels. Serial is the reference
/// implementation kept for testing; Parallel runs the same per-item work under
/// OpenMP. Both must produce bit-identical results: every item writes its own
/// slot and reductions run in a fixed order after the loop.
enum class ExecPolicy {
    Serial,
    Parallel,
};

} // namespace esw
