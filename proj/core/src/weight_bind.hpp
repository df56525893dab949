#pragma once

#include "waveformer/checkpoint.hpp"
#include "waveformer/errors.hpp"
#include "waveformer/tensor.hpp"

#include <string>
#include <vector>

namespace waveformer::detail {

inline const NamedTensor& entry(const NamedTensorSet& set, const std::string& name) {
    const auto it = set.entries.find(name);
    if (it == set.entries.end())
        throw ValidationError("checkpoint missing tensor: " + name);
    return it->second;
}

inline Tensor3 bind3(const NamedTensorSet& set, const std::string& name) {
    const NamedTensor& t = entry(set, name);
    if (t.dims.size() != 3)
        throw ValidationError("tensor " + name + " is not rank 3");
    Tensor3 out(static_cast<int>(t.dims[0]), static_cast<int>(t.dims[1]),
                static_cast<int>(t.dims[2]));
    out.data = t.data;
    return out;
}

inline Tensor2 bind2(const NamedTensorSet& set, const std::string& name) {
    const NamedTensor& t = entry(set, name);
    if (t.dims.size() != 2)
        throw ValidationError("tensor " + name + " is not rank 2");
    Tensor2 out(static_cast<int>(t.dims[0]), static_cast<int>(t.dims[1]));
    out.data = t.data;
    return out;
}

inline std::vector<float> bind1(const NamedTensorSet& set, const std::string& name) {
    const NamedTensor& t = entry(set, name);
    if (t.dims.size() != 1)
        throw ValidationError("tensor " + name + " is not rank 1");
    return t.data;
}

} // namespace waveformer::detail
