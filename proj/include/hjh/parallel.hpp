#pragma once

namespace hjh {

// Caps worker threads for all OpenMP regions; 0 keeps the runtime default.
void set_max_threads(int n);
int max_threads();

}  // namespace hjh
