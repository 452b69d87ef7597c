#pragma once

#include <span>
#include <string>
#include <string_view>

namespace paramkl
{

/// Incremental SHA-256, hex digest.
class Sha256
{
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(std::string_view bytes);
  void update(std::span<const double> values);
  std::string hex_digest();

 private:
  void* ctx_;
};

std::string sha256_hex(std::string_view bytes);

}  // namespace paramkl
