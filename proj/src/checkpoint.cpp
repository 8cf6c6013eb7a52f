#include "harmonics/checkpoint.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace harmonics::checkpoint {

namespace {

constexpr const char* kMagic = "vaeharm-checkpoint";
constexpr int kVersion = 1;

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_values(std::ostringstream& os, const char* tag, const Vec& v) {
    os << tag;
    for (double x : v) os << " " << fmt(x);
    os << "\n";
}

std::string network_payload(const DenseNetwork& net, const std::string& name) {
    std::ostringstream os;
    os << "net " << name << " " << net.layers.size() << "\n";
    for (const DenseLayer& l : net.layers) {
        os << "layer " << l.weight.rows << " " << l.weight.cols << " " << to_string(l.act) << "\n";
        write_values(os, "W", l.weight.a);
        write_values(os, "b", l.bias);
    }
    return os.str();
}

std::string wrap(const std::string& payload) {
    std::ostringstream os;
    char hex[24];
    std::snprintf(hex, sizeof(hex), "%016" PRIx64, fnv1a(payload));
    os << kMagic << " " << kVersion << "\n" << "checksum " << hex << "\n" << payload;
    return os.str();
}

class Reader {
public:
    explicit Reader(const std::string& text) : is_(text) {}

    /// Validates magic, version, checksum; leaves the stream at the payload.
    void open_envelope(const std::string& text) {
        std::string magic, cs_tag, cs_hex;
        int version = 0;
        is_ >> magic >> version;
        require(magic == kMagic, "checkpoint: not a checkpoint file");
        require(version == kVersion,
                "checkpoint: version mismatch (got " + std::to_string(version) + ")");
        is_ >> cs_tag >> cs_hex;
        require(cs_tag == "checksum", "checkpoint: missing checksum");
        std::getline(is_, line_buf_); // rest of the checksum line
        const size_t payload_pos = static_cast<size_t>(is_.tellg());
        const std::string payload = text.substr(payload_pos);
        char hex[24];
        std::snprintf(hex, sizeof(hex), "%016" PRIx64, fnv1a(payload));
        require(cs_hex == hex, "checkpoint: corrupt file (checksum mismatch)");
    }

    std::string word() {
        std::string w;
        require(static_cast<bool>(is_ >> w), "checkpoint: truncated file");
        return w;
    }
    int integer() { return std::stoi(word()); }
    double real() { return std::stod(word()); }

    void expect(const std::string& tag) {
        require(word() == tag, "checkpoint: malformed file, expected '" + tag + "'");
    }

    DenseNetwork network(const std::string& name) {
        expect("net");
        expect(name);
        const int n_layers = integer();
        DenseNetwork net;
        for (int l = 0; l < n_layers; ++l) {
            expect("layer");
            const int rows = integer();
            const int cols = integer();
            DenseLayer layer;
            layer.act = activation_from_string(word());
            layer.weight = Mat(rows, cols);
            expect("W");
            for (double& v : layer.weight.a) v = real();
            layer.bias.resize(rows);
            expect("b");
            for (double& v : layer.bias) v = real();
            net.layers.push_back(std::move(layer));
        }
        return net;
    }

private:
    std::istringstream is_;
    std::string line_buf_;
};

} // namespace

std::string serialize(const DenseNetwork& net) {
    return wrap(network_payload(net, "network"));
}

DenseNetwork deserialize_network(const std::string& text) {
    Reader r(text);
    r.open_envelope(text);
    return r.network("network");
}

std::string serialize(const VaeModel& model, const std::map<std::string, std::string>& metadata) {
    std::ostringstream os;
    os << "model vae\n";
    os << "data_dim " << model.data_dim << "\n";
    os << "latent_dim " << model.latent_dim << "\n";
    os << "sigma_theta " << fmt(model.sigma_theta) << "\n";
    if (model.learned_scale()) {
        os << "encoder_scale learned\n";
    } else {
        std::ostringstream fs;
        write_values(fs, "encoder_scale fixed", model.fixed_sigma_phi);
        os << fs.str();
    }
    os << "meta_count " << metadata.size() << "\n";
    for (const auto& [k, v] : metadata) os << "meta " << k << " " << v << "\n";
    os << network_payload(model.encoder_mean, "encoder_mean");
    if (model.learned_scale()) os << network_payload(*model.encoder_scale_net, "encoder_scale");
    os << network_payload(model.decoder, "decoder");
    return wrap(os.str());
}

VaeModel deserialize_model(const std::string& text,
                           std::map<std::string, std::string>* metadata_out) {
    Reader r(text);
    r.open_envelope(text);
    r.expect("model");
    r.expect("vae");
    VaeModel m;
    r.expect("data_dim");
    m.data_dim = r.integer();
    r.expect("latent_dim");
    m.latent_dim = r.integer();
    r.expect("sigma_theta");
    m.sigma_theta = r.real();
    r.expect("encoder_scale");
    const std::string mode = r.word();
    bool learned = false;
    if (mode == "learned") {
        learned = true;
    } else {
        require(mode == "fixed", "checkpoint: bad encoder_scale mode");
        m.fixed_sigma_phi.resize(m.latent_dim);
        for (double& v : m.fixed_sigma_phi) v = r.real();
    }
    r.expect("meta_count");
    const int n_meta = r.integer();
    for (int i = 0; i < n_meta; ++i) {
        r.expect("meta");
        const std::string key = r.word();
        const std::string val = r.word();
        if (metadata_out) (*metadata_out)[key] = val;
    }
    m.encoder_mean = r.network("encoder_mean");
    if (learned) m.encoder_scale_net = r.network("encoder_scale");
    m.decoder = r.network("decoder");
    return m;
}

void save_model(const VaeModel& model, const std::string& path,
                const std::map<std::string, std::string>& metadata) {
    std::ofstream f(path);
    require(f.good(), "checkpoint: cannot write " + path);
    f << serialize(model, metadata);
}

VaeModel load_model(const std::string& path, std::map<std::string, std::string>* metadata_out) {
    std::ifstream f(path);
    require(f.good(), "checkpoint: cannot read " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return deserialize_model(os.str(), metadata_out);
}

} // namespace harmonics::checkpoint
