/*
 * Copyright 2026 The mistriage Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "mistriage/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "mistriage/error.hpp"

namespace mistriage {
namespace {

constexpr std::string_view kMagic = "MTCKPT01";

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::string_view take(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw ParseError("checkpoint is truncated");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string Checkpoint::serialize() const {
  params.check_shapes(config);
  nlohmann::json meta = metadata;
  meta["model_config"] = config.to_json();
  const std::string meta_text = meta.dump();

  std::string out(kMagic);
  put<std::uint64_t>(out, meta_text.size());
  out += meta_text;
  std::uint64_t count = 0;
  params.visit([&](const std::string&, const Matrix&, bool) { ++count; });
  put<std::uint64_t>(out, count);
  params.visit([&](const std::string& name, const Matrix& m, bool) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
    out.append(reinterpret_cast<const char*>(m.data()),
               static_cast<std::size_t>(m.size()) * sizeof(double));
  });
  return out;
}

Checkpoint Checkpoint::parse(std::string_view bytes) {
  Reader in(bytes);
  if (in.take(kMagic.size()) != kMagic) throw ParseError("not a mistriage checkpoint");
  const auto meta_len = in.get<std::uint64_t>();
  Checkpoint ckpt;
  ckpt.metadata = nlohmann::json::parse(in.take(meta_len));
  ckpt.config = ModelConfig::from_json(ckpt.metadata.at("model_config"));
  ckpt.params = ModelParams::zeros(ckpt.config);

  std::uint64_t expected = 0;
  ckpt.params.visit([&](const std::string&, const Matrix&, bool) { ++expected; });
  if (in.get<std::uint64_t>() != expected) throw ParseError("checkpoint tensor count mismatch");
  ckpt.params.visit([&](const std::string& name, Matrix& m, bool) {
    const auto len = in.get<std::uint32_t>();
    if (in.take(len) != name) throw ParseError("checkpoint tensor order mismatch at " + name);
    const auto rows = in.get<std::uint64_t>();
    const auto cols = in.get<std::uint64_t>();
    if (rows != static_cast<std::uint64_t>(m.rows()) ||
        cols != static_cast<std::uint64_t>(m.cols())) {
      throw ParseError("checkpoint shape mismatch for " + name);
    }
    const auto data = in.take(static_cast<std::size_t>(rows * cols) * sizeof(double));
    std::memcpy(m.data(), data.data(), data.size());
  });
  if (!in.done()) throw ParseError("trailing bytes after checkpoint");
  if (!ckpt.params.all_finite()) throw ParseError("checkpoint holds non-finite parameters");
  return ckpt;
}

}  // namespace mistriage
