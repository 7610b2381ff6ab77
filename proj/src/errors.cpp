#include "manp/errors.hpp"

namespace manp {
namespace {

std::string join_problems(const std::vector<std::string>& problems)
{
    std::string out = "invalid configuration (" + std::to_string(problems.size()) + " problem";
    out += problems.size() == 1 ? ")" : "s)";
    for (const auto& p : problems) {
        out += "\n  - ";
        out += p;
    }
    return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error(Category::Config, join_problems(problems)), problems_(std::move(problems))
{
}

const char* category_name(Error::Category category) noexcept
{
    switch (category) {
    case Error::Category::InvalidArgument: return "invalid-argument";
    case Error::Category::UnsupportedRatio: return "unsupported-ratio";
    case Error::Category::NotFound: return "not-found";
    case Error::Category::NotAvailable: return "not-available";
    case Error::Category::Format: return "format";
    case Error::Category::Config: return "config";
    }
    return "unknown";
}

}  // namespace manp
