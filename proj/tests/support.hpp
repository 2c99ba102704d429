#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sageforge/common.hpp"
#include "sageforge/corpus.hpp"
#include "sageforge/tokenizer.hpp"

namespace sageforge::testing {

inline std::filesystem::path fixtures() { return SAGEFORGE_FIXTURES; }

inline const std::vector<corpus::SourceFile>& fixture_files() {
  static const auto files = corpus::ingest_directory(fixtures() / "corpus", Language::Python).files;
  return files;
}

inline std::vector<std::string> fixture_texts() {
  std::vector<std::string> out;
  for (const auto& f : fixture_files()) out.push_back(f.content);
  return out;
}

// Tokenizer trained once per test binary on the fixture corpus.
inline const Tokenizer& fixture_tokenizer() {
  static const Tokenizer tok = [] {
    const auto texts = fixture_texts();
    return Tokenizer::train(texts, 2000, 1);
  }();
  return tok;
}

inline std::vector<corpus::SourceFunction> fixture_functions() {
  std::vector<corpus::SourceFunction> out;
  for (const auto& f : fixture_files()) {
    for (auto& fn : corpus::extract_functions(f)) out.push_back(std::move(fn));
  }
  return out;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("sageforge-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Random valid UTF-8 drawn evenly from the four encoded lengths.
inline std::string random_utf8(Rng& rng, std::size_t max_chars) {
  std::string s;
  const std::size_t n = rng.uniform_index(max_chars + 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t cp = 0;
    switch (rng.uniform_index(4)) {
      case 0: cp = static_cast<std::uint32_t>(rng.uniform_index(0x80)); break;
      case 1: cp = 0x80 + static_cast<std::uint32_t>(rng.uniform_index(0x800 - 0x80)); break;
      case 2:
        do {
          cp = 0x800 + static_cast<std::uint32_t>(rng.uniform_index(0x10000 - 0x800));
        } while (cp >= 0xD800 && cp <= 0xDFFF);
        break;
      default: cp = 0x10000 + static_cast<std::uint32_t>(rng.uniform_index(0x110000 - 0x10000)); break;
    }
    if (cp < 0x80) {
      s += static_cast<char>(cp);
    } else if (cp < 0x800) {
      s += static_cast<char>(0xC0 | (cp >> 6));
      s += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      s += static_cast<char>(0xE0 | (cp >> 12));
      s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      s += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      s += static_cast<char>(0xF0 | (cp >> 18));
      s += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      s += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }
  return s;
}

}  // namespace sageforge::testing
