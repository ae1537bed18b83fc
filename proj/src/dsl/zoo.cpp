#include "arn/dsl/zoo.hpp"

#include <map>
#include <stdexcept>

#include "arn/dsl/parser.hpp"

namespace arn::dsl {

namespace {

struct ZooEntry {
    const char* name;
    const char* source;
};

// Generated by CMake from corpus/*.arn.
#include "zoo_corpus.inc"

const std::map<std::string, std::string>& table() {
    static const std::map<std::string, std::string> t = [] {
        std::map<std::string, std::string> m;
        for (const auto& e : kZooEntries) m[e.name] = e.source;
        return m;
    }();
    return t;
}

}  // namespace

const std::vector<std::string>& zoo_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& e : kZooEntries) n.push_back(e.name);
        return n;
    }();
    return names;
}

bool zoo_has(const std::string& name) { return table().count(name) > 0; }

const std::string& zoo_source(const std::string& name) {
    auto it = table().find(name);
    if (it == table().end()) throw std::out_of_range("no zoo neuron named `" + name + "`");
    return it->second;
}

NeuronProgram zoo_program(const std::string& name) {
    // the declared function name stays `f`; corpus names are not identifiers
    return parse(zoo_source(name));
}

}  // namespace arn::dsl
