#pragma once

#include <string>
#include <string_view>

namespace coursegate {

// "sha256:" followed by the lowercase hex digest of `bytes`.
std::string content_hash(std::string_view bytes);

struct Artifact {
  std::string id;  // content_hash(bytes)
  std::string kind;
  std::string bytes;
  std::string run_id;
  std::string node;
  std::string port;

  bool operator==(const Artifact&) const = default;
};

}  // namespace coursegate
