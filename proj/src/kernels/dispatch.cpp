#include "fixpoint/kernels.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace fixpoint::kernels {
namespace {

const Backend* best_supported() {
#if defined(FIXPOINT_HAVE_AVX2)
  if (avx2_supported()) return &avx2_backend();
#endif
#if defined(FIXPOINT_HAVE_NEON)
  return &neon_backend();
#endif
  return &scalar_backend();
}

const Backend* select() {
  const char* env = std::getenv("FIXPOINT_KERNELS");
  if (env == nullptr || *env == '\0' || std::strcmp(env, "auto") == 0)
    return best_supported();
  if (std::strcmp(env, "scalar") == 0) return &scalar_backend();
#if defined(FIXPOINT_HAVE_AVX2)
  if (std::strcmp(env, "avx2") == 0) {
    if (avx2_supported()) return &avx2_backend();
    std::fprintf(stderr, "fixpoint: avx2 kernels requested but cpu lacks avx2, using scalar\n");
    return &scalar_backend();
  }
#endif
#if defined(FIXPOINT_HAVE_NEON)
  if (std::strcmp(env, "neon") == 0) return &neon_backend();
#endif
  std::fprintf(stderr, "fixpoint: unknown FIXPOINT_KERNELS value '%s', using auto\n", env);
  return best_supported();
}

}  // namespace

const Backend& active() {
  static const Backend* chosen = select();
  return *chosen;
}

const std::vector<const Backend*>& compiled_backends() {
  static const std::vector<const Backend*> all = [] {
    std::vector<const Backend*> v{&scalar_backend()};
#if defined(FIXPOINT_HAVE_AVX2)
    if (avx2_supported()) v.push_back(&avx2_backend());
#endif
#if defined(FIXPOINT_HAVE_NEON)
    v.push_back(&neon_backend());
#endif
    return v;
  }();
  return all;
}

}  // namespace fixpoint::kernels
