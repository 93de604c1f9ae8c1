#ifndef CLOZEQA_IO_H_
#define CLOZEQA_IO_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

namespace clozeqa::io {

// Reads a text file line by line. Gzip input is recognised by its magic
// bytes and decompressed transparently. Trailing "\r\n" / "\n" is stripped.
class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path);
  ~LineReader();
  LineReader(LineReader&&) noexcept;
  LineReader& operator=(LineReader&&) noexcept;

  // Returns false at end of input. Throws IoError on a read failure.
  bool next(std::string& line);

  bool gzipped() const { return gzipped_; }
  std::uint64_t line_number() const { return line_number_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::filesystem::path path_;
  bool gzipped_ = false;
  std::uint64_t line_number_ = 0;
};

bool has_gzip_magic(const std::filesystem::path& path);

// Whole-file read (decompressing gzip input).
std::string read_file(const std::filesystem::path& path);

// Writes `contents` to `path`, replacing any existing file.
void write_file(const std::filesystem::path& path, std::string_view contents);

// Lowercase hex SHA-256 digests.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace clozeqa::io

#endif  // CLOZEQA_IO_H_
