#ifndef CLOZEQA_ERROR_H_
#define CLOZEQA_ERROR_H_

#include <stdexcept>
#include <string>

namespace clozeqa {

// A file could not be opened, read or written. The message names the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input was readable but structurally unusable (e.g. a missing header).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace clozeqa

#endif  // CLOZEQA_ERROR_H_
