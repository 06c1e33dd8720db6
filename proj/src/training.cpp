#include "lbf/training.hpp"

#include <cstdlib>
#include <string>
#include <thread>

#include "lbf/error.hpp"
#include "lbf/neural_net.hpp"
#include "lbf/random_forest.hpp"
#include "lbf/svm.hpp"

namespace lbf {

std::string ClassifierSpec::name() const {
    switch (kind) {
        case ClassifierKind::svm: return "SVM";
        case ClassifierKind::rf: return "RF-" + std::to_string(trees);
        case ClassifierKind::nn: {
            std::string s = "NN-";
            for (std::size_t i = 0; i < hidden.size(); ++i) s += (i ? "," : "") + std::to_string(hidden[i]);
            return s;
        }
    }
    return "?";
}

double ClassifierSpec::non_key_value() const {
    switch (kind) {
        case ClassifierKind::svm: return c;
        case ClassifierKind::nn: return lr;
        case ClassifierKind::rf: return static_cast<double>(min_leaf);
    }
    return 0.0;
}

ClassifierSpec ClassifierSpec::with_non_key(double value) const {
    ClassifierSpec out = *this;
    switch (kind) {
        case ClassifierKind::svm: out.c = value; break;
        case ClassifierKind::nn: out.lr = value; break;
        case ClassifierKind::rf: out.min_leaf = static_cast<std::size_t>(value); break;
    }
    return out;
}

ClassifierPtr train_classifier(const LabeledDataset& data, const ClassifierSpec& spec, std::uint64_t seed) {
    switch (spec.kind) {
        case ClassifierKind::svm: {
            SvmOptions o;
            o.c = spec.c;
            o.cost_sensitive = spec.cost_sensitive;
            o.seed = seed;
            o.max_epochs = spec.svm_epochs;
            return train_svm(data, o);
        }
        case ClassifierKind::nn: {
            NnOptions o;
            o.hidden = spec.hidden;
            o.lr = spec.lr;
            o.cost_sensitive = spec.cost_sensitive;
            o.seed = seed;
            o.epochs = spec.nn_epochs;
            return train_nn(data, o);
        }
        case ClassifierKind::rf: {
            RfOptions o;
            o.trees = spec.trees;
            o.min_leaf = spec.min_leaf;
            o.imbalance_aware = spec.cost_sensitive;
            o.seed = seed;
            return train_rf(data, o);
        }
    }
    throw InvalidArgument("train_classifier: unknown kind");
}

std::size_t worker_count() {
    if (const char* env = std::getenv("LBF_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    auto hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace lbf
