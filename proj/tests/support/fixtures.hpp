#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "absaug/corpus.hpp"
#include "absaug/reward.hpp"

namespace absaug::testing {

/// Twelve hand-written review instances: 6 positive, 2 neutral, 4 negative.
Dataset fixture_dataset();

/// Candidate texts the mock augmenter returns for instance i of the fixture.
std::vector<std::string> fixture_candidates(const Instance& instance, std::size_t i);

/// Mock script covering every augmentation and prediction prompt the fixture pipeline
/// sends. Pools rotate through normal, chosen-empty, rejected-empty and skip shapes.
std::string fixture_mock_script(const Dataset& d);

/// Instances with exactly the given label counts, sentences unique per instance.
Dataset synthetic_dataset(std::size_t positive, std::size_t neutral, std::size_t negative);

/// Short documents mixing words from a few themed vocabularies; a fixed seed gives a
/// fixed corpus.
std::vector<std::string> synthetic_corpus(std::size_t documents, std::uint64_t seed);

/// A unique directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Source directory of the test tree, set at build time.
std::filesystem::path source_dir();

/// Writes the fixture dataset, its mock script and a pipeline config into dir.
/// Returns the config path.
std::filesystem::path write_fixture_workspace(const std::filesystem::path& dir);

/// One pool with the given flags and relevances, texts "cand-<i>".
ScoredPool make_pool(const std::vector<bool>& consistent, const std::vector<double>& relevance,
                     std::string source_id = "s");

}  // namespace absaug::testing
