#pragma once

#include <stdexcept>
#include <string>

namespace migmine {

struct RepoUnreadable : std::runtime_error {
    explicit RepoUnreadable(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyCorpus : std::runtime_error {
    explicit EmptyCorpus(const std::string& what) : std::runtime_error(what) {}
};

struct NoOutgoingEdges : std::runtime_error {
    explicit NoOutgoingEdges(const std::string& what) : std::runtime_error(what) {}
};

struct IsolatedNode : std::runtime_error {
    explicit IsolatedNode(const std::string& what) : std::runtime_error(what) {}
};

} // namespace migmine
