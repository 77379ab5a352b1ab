#pragma once

#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace taylam {

using NameId = std::uint32_t;

// Global table of surface names for free variables. Append-only; ids are
// stable for the lifetime of the process and safe to share across threads.
class NameTable {
public:
    static NameTable& instance() {
        static NameTable table;
        return table;
    }

    NameId intern(std::string_view text) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = ids_.find(std::string(text));
        if (it != ids_.end()) return it->second;
        NameId id = static_cast<NameId>(texts_.size());
        texts_.emplace_back(text);
        ids_.emplace(texts_.back(), id);
        return id;
    }

    std::string text(NameId id) const {
        std::lock_guard<std::mutex> lock(mutex_);
        if (id >= texts_.size()) throw std::out_of_range("unknown name id");
        return texts_[id];
    }

private:
    NameTable() = default;
    mutable std::mutex mutex_;
    std::vector<std::string> texts_;
    std::unordered_map<std::string, NameId> ids_;
};

inline NameId intern_name(std::string_view text) {
    return NameTable::instance().intern(text);
}

inline std::string name_text(NameId id) {
    return NameTable::instance().text(id);
}

} // namespace taylam
