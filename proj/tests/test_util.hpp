#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "affectfuse/labels.hpp"
#include "affectfuse/observation.hpp"

namespace aftest {

/// Unique scratch directory, removed on scope exit.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        const auto stamp = std::to_string(::getpid()) + "_" + tag + "_" +
                           std::to_string(counter.fetch_add(1));
        path_ = std::filesystem::temp_directory_path() / ("affectfuse_test_" + stamp);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

  private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Draws a uniformly random label of the given cue.
inline affectfuse::CueLabel random_label(affectfuse::CueKind cue, std::mt19937_64& gen) {
    std::uniform_int_distribution<std::size_t> pick(0, affectfuse::label_space_size(cue) - 1);
    return affectfuse::CueLabel{cue, static_cast<std::uint8_t>(pick(gen))};
}

inline affectfuse::Observation make_obs(std::int64_t ts, std::string student,
                                        affectfuse::CueLabel label) {
    affectfuse::Observation o;
    o.timestamp_ms = ts;
    o.student_id = std::move(student);
    o.label = label;
    return o;
}

}  // namespace aftest
