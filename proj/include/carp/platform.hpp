#pragma once

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace carp {

/// Keep freed tensor buffers in the process instead of returning them to the
/// OS after every forward pass. Only affects glibc; call once from main().
inline void tune_allocator() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
  mallopt(M_TRIM_THRESHOLD, 256 << 20);
  mallopt(M_TOP_PAD, 64 << 20);
#endif
}

}  // namespace carp
