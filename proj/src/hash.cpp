#include "paramkl/hash.hpp"

#include "paramkl/error.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <cstdint>

namespace paramkl
{

namespace
{
EVP_MD_CTX* as_ctx(void* p) { return static_cast<EVP_MD_CTX*>(p); }
}  // namespace

Sha256::Sha256() : ctx_(EVP_MD_CTX_new())
{
  if (!ctx_ || EVP_DigestInit_ex(as_ctx(ctx_), EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 initialization failed");
}

Sha256::~Sha256() { EVP_MD_CTX_free(as_ctx(ctx_)); }

void Sha256::update(std::string_view bytes)
{
  EVP_DigestUpdate(as_ctx(ctx_), bytes.data(), bytes.size());
}

void Sha256::update(std::span<const double> values)
{
  std::array<unsigned char, 8> le{};
  for (double v : values)
  {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) le[b] = static_cast<unsigned char>(bits >> (8 * b));
    EVP_DigestUpdate(as_ctx(ctx_), le.data(), le.size());
  }
}

std::string Sha256::hex_digest()
{
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(as_ctx(ctx_), digest.data(), &len);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i)
  {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string sha256_hex(std::string_view bytes)
{
  Sha256 h;
  h.update(bytes);
  return h.hex_digest();
}

}  // namespace paramkl
