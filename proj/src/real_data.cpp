#include "rlasso/real_data.hpp"

#include "rlasso/cli_io.hpp"

namespace rlasso::real_data {

const std::string& rd_expenditure_csv() {
    static const std::string csv =
        "Year,Y,X1,X2,X3,X4\n"
        "1972,2.3,1.9,2.2,1.9,3.7\n"
        "1975,2.2,1.8,2.2,2.0,3.8\n"
        "1979,2.2,1.8,2.4,2.1,3.6\n"
        "1980,2.3,1.8,2.4,2.2,3.8\n"
        "1981,2.4,2.0,2.5,2.3,3.8\n"
        "1982,2.5,2.1,2.6,2.4,3.7\n"
        "1983,2.6,2.1,2.6,2.6,3.8\n"
        "1984,2.6,2.2,2.6,2.6,4.0\n"
        "1985,2.7,2.3,2.8,2.8,3.7\n"
        "1986,2.7,2.3,2.7,2.8,3.8\n";
    return csv;
}

Dataset rd_expenditure() {
    Dataset data = parse_csv(rd_expenditure_csv(), "Y", true);
    // Year labels the rows; it is not a regressor.
    Dataset out;
    out.x.resize(data.n(), data.p() - 1);
    out.x.col(0) = data.x.col(0);
    out.x.rightCols(data.p() - 2) = data.x.rightCols(data.p() - 2);
    out.y = data.y;
    out.names = {data.names[0], "X1", "X2", "X3", "X4"};
    validate_dataset(out);
    return out;
}

RestrictionSet rd_restrictions() {
    RestrictionSet set;
    set.rmat.resize(2, 5);
    set.rmat << 1, 1, 1, 1, 1,
                0, 1, 3, 1, 2;
    set.rvec.resize(2);
    set.rvec << 1.2170, 1.0904;
    return set;
}

Eigen::VectorXd rd_prior() {
    Eigen::VectorXd prior(5);
    prior << 0.6, 0.7, 0.0, 0.6, -0.5;
    return prior;
}

}  // namespace rlasso::real_data
