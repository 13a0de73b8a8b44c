#pragma once

// Thin wrapper over the OpenMP runtime so callers compile with or without it.

namespace nldlab {

/// Sets the number of worker threads for subsequent parallel regions.
void set_worker_count(int workers);

/// Current upper bound on worker threads (1 without OpenMP).
int worker_count();

}  // namespace nldlab
