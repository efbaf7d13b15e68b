#include <hsr/model_io.hpp>

#include <fstream>

namespace hsr {

using nlohmann::json;

json to_json(const HierModel& m)
{
	json sites = json::array();
	for (Index i = 0; i < m.sites.rows(); ++i) {
		json row = json::array();
		for (Index j = 0; j < m.sites.cols(); ++j)
			row.push_back(m.sites(i, j));
		sites.push_back(std::move(row));
	}
	json domain = json::array();
	for (const auto& [lo, hi] : m.domain)
		domain.push_back({lo, hi});

	return json{
	    {"version", model_format_version},
	    {"d", m.dim},
	    {"T", m.T},
	    {"P", m.P},
	    {"S_a", m.scale},
	    {"epsilon", m.epsilon},
	    {"delta", m.delta},
	    {"k_oversample", m.k_oversample},
	    {"seed", m.seed},
	    {"tol", m.tol},
	    {"status", std::string(to_string(m.status))},
	    {"n_train", m.n_train},
	    {"residual_2norm", m.residual_2norm},
	    {"residual_inf_norm", m.residual_inf_norm},
	    {"sampled_fraction", m.sampled_fraction},
	    {"sites", std::move(sites)},
	    {"coeffs", std::vector<double>(m.coeffs.data(), m.coeffs.data() + m.coeffs.size())},
	    {"indices", m.indices},
	    {"domain", std::move(domain)},
	    {"normalization",
	     {{"axis_scales", m.normalization.axis_scales},
	      {"value_scale", m.normalization.value_scale}}},
	};
}

HierModel model_from_json(const json& j)
{
	try {
		if (j.at("version").get<int>() != model_format_version)
			throw Error("unsupported model version " + j.at("version").dump());
		HierModel m;
		m.dim = j.at("d").get<Index>();
		m.T = j.at("T").get<double>();
		m.P = j.at("P").get<double>();
		m.scale = j.at("S_a").get<int>();
		m.epsilon = j.at("epsilon").get<double>();
		m.delta = j.at("delta").get<double>();
		m.k_oversample = j.value("k_oversample", Index{8});
		m.seed = j.at("seed").get<std::uint64_t>();
		m.tol = j.value("tol", 0.0);
		m.status = parse_fit_status(j.value("status", std::string("Converged")));
		m.n_train = j.value("n_train", Index{0});
		m.residual_2norm = j.value("residual_2norm", 0.0);
		m.residual_inf_norm = j.value("residual_inf_norm", 0.0);
		m.sampled_fraction = j.value("sampled_fraction", 0.0);

		const auto& sites = j.at("sites");
		const auto coeffs = j.at("coeffs").get<std::vector<double>>();
		if (sites.size() != coeffs.size())
			throw Error("model has " + std::to_string(sites.size()) + " sites but " +
			            std::to_string(coeffs.size()) + " coefficients");
		m.sites.resize(static_cast<Index>(sites.size()), m.dim);
		for (std::size_t i = 0; i < sites.size(); ++i) {
			const auto row = sites[i].get<std::vector<double>>();
			if (static_cast<Index>(row.size()) != m.dim)
				throw Error("model site " + std::to_string(i) + " has the wrong dimension");
			for (Index k = 0; k < m.dim; ++k)
				m.sites(static_cast<Index>(i), k) = row[static_cast<std::size_t>(k)];
		}
		m.coeffs = Eigen::Map<const Vector>(coeffs.data(), static_cast<Index>(coeffs.size()));
		if (j.contains("indices"))
			m.indices = j.at("indices").get<std::vector<Index>>();
		if (j.contains("domain"))
			for (const auto& b : j.at("domain"))
				m.domain.emplace_back(b.at(0).get<double>(), b.at(1).get<double>());

		const auto& norm = j.at("normalization");
		m.normalization.axis_scales = norm.at("axis_scales").get<std::vector<double>>();
		m.normalization.value_scale = norm.at("value_scale").get<double>();
		if (static_cast<Index>(m.normalization.axis_scales.size()) != m.dim)
			throw Error("model normalization has the wrong number of axes");
		return m;
	} catch (const json::exception& e) {
		throw Error(std::string("malformed model file: ") + e.what());
	}
}

void save_model(const std::filesystem::path& path, const HierModel& model, const json& config)
{
	json j = to_json(model);
	if (!config.is_null())
		j["config"] = config;
	std::ofstream out(path);
	if (!out)
		throw Error("cannot write " + path.string());
	out << j.dump(1, '\t') << '\n';
	if (!out)
		throw Error("write failed for " + path.string());
}

HierModel load_model(const std::filesystem::path& path)
{
	std::ifstream in(path);
	if (!in)
		throw Error("cannot open " + path.string());
	json j;
	try {
		in >> j;
	} catch (const json::exception& e) {
		throw Error(std::string("malformed model file: ") + e.what());
	}
	return model_from_json(j);
}

} // namespace hsr
