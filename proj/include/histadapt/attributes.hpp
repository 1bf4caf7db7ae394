// attributes: metadata attribute space for multi-attribute adaptation.
#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "histadapt/common.hpp"
#include "histadapt/corpus.hpp"

namespace histadapt {

// Attribute m=0 is the shared slot, active for every document. Attributes
// m >= 1 are distinct `key=value` pairs harvested from document metadata.
class AttributeSpace {
 public:
  static AttributeSpace shared_only() {
    AttributeSpace s;
    s.names_.push_back("__shared__");
    return s;
  }

  static AttributeSpace from_corpora(const std::vector<const Corpus*>& corpora,
                                     const std::vector<std::string>& keys) {
    std::set<std::string> distinct;
    for (const Corpus* c : corpora) {
      if (!c) continue;
      for (const auto& doc : c->documents) {
        for (const auto& key : keys) {
          if (const std::string* v = doc.attribute(key)) distinct.insert(key + "=" + *v);
        }
      }
    }
    AttributeSpace s = shared_only();
    for (const auto& name : distinct) s.names_.push_back(name);
    s.keys_ = keys;
    return s;
  }

  // M + 1 (shared slot included).
  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<std::string>& keys() const { return keys_; }

  std::vector<uint8_t> z_for(const Document& doc) const {
    std::vector<uint8_t> z(names_.size(), 0);
    z[0] = 1;
    for (std::size_t m = 1; m < names_.size(); ++m) {
      std::size_t eq = names_[m].find('=');
      const std::string key = names_[m].substr(0, eq);
      const std::string value = names_[m].substr(eq + 1);
      const std::string* v = doc.attribute(key);
      if (v && *v == value) z[m] = 1;
    }
    return z;
  }

 private:
  std::vector<std::string> names_;
  std::vector<std::string> keys_;
};

}  // namespace histadapt
