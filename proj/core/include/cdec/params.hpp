#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cdec/errors.hpp"
#include "cdec/matrix.hpp"

namespace cdec {

// Ordered collection of named tensors. Order is insertion order and is part
// of the determinism contract (optimizer steps and checkpoints iterate it).
class ParamSet {
public:
    struct Entry {
        std::string name;
        Matrix value;
    };

    void add(std::string name, Matrix value) {
        if (has(name)) {
            throw ArgumentError("ParamSet: duplicate name '" + name + "'");
        }
        entries_.push_back({std::move(name), std::move(value)});
    }

    bool has(std::string_view name) const { return find(name) != nullptr; }

    const Matrix& get(std::string_view name) const {
        const Entry* e = find(name);
        if (!e) throw ArgumentError("ParamSet: unknown name '" + std::string(name) + "'");
        return e->value;
    }

    Matrix& get(std::string_view name) {
        return const_cast<Matrix&>(std::as_const(*this).get(name));
    }

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    auto begin() { return entries_.begin(); }
    auto end() { return entries_.end(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    const Entry& operator[](std::size_t i) const { return entries_[i]; }
    Entry& operator[](std::size_t i) { return entries_[i]; }

    std::size_t scalar_count() const {
        std::size_t n = 0;
        for (const Entry& e : entries_) n += e.value.size();
        return n;
    }

private:
    const Entry* find(std::string_view name) const {
        for (const Entry& e : entries_) {
            if (e.name == name) return &e;
        }
        return nullptr;
    }

    std::vector<Entry> entries_;
};

}  // namespace cdec
