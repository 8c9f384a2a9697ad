#ifndef SPARSELAB_COMMON_HPP
#define SPARSELAB_COMMON_HPP

#include <stdexcept>
#include <string>

namespace sparselab {

enum class Errc {
  invalid_argument,
  rank_deficient,
  iteration_limit,
  infeasible,
  unbounded,
  set_too_large,
  degenerate_fit,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string what) : std::runtime_error(std::move(what)), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace sparselab

#endif
