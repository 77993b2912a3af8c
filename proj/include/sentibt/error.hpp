#pragma once

#include <stdexcept>
#include <string>

namespace sentibt {

// Every failure in the pipeline carries a stable code plus enough context
// (module, operation, location) to print one machine-parseable line.
class Error : public std::runtime_error {
public:
    Error(std::string code, std::string module, std::string op,
          std::string location, const std::string& message)
        : std::runtime_error(message),
          code_(std::move(code)),
          module_(std::move(module)),
          op_(std::move(op)),
          location_(std::move(location)) {}

    const std::string& code() const { return code_; }
    const std::string& module_name() const { return module_; }
    const std::string& op() const { return op_; }
    const std::string& location() const { return location_; }

    // error module=<m> op=<o> loc=<l> code=<c> msg="..."
    std::string structured_line() const;

private:
    std::string code_;
    std::string module_;
    std::string op_;
    std::string location_;
};

} // namespace sentibt
