#pragma once

namespace vcs {

/// Selects the OpenMP kernel or the serial reference path. Both paths run the
/// same per-task code, so results agree bit for bit where tasks are merged in
/// a fixed order.
enum class Execution { Serial, Parallel };

}  // namespace vcs
