#include "har/nn/network.hpp"

namespace har::nn {

template class Network<float>;
template class Network<double>;

}  // namespace har::nn
