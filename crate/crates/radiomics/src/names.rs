use std::sync::LazyLock;

pub const FIRST_ORDER: [&str; 18] = [
    "Energy",
    "TotalEnergy",
    "Entropy",
    "Minimum",
    "10Percentile",
    "90Percentile",
    "Maximum",
    "Mean",
    "Median",
    "InterquartileRange",
    "Range",
    "MeanAbsoluteDeviation",
    "RobustMeanAbsoluteDeviation",
    "RootMeanSquared",
    "Skewness",
    "Kurtosis",
    "Variance",
    "Uniformity",
];

pub const GLCM: [&str; 24] = [
    "Autocorrelation",
    "JointAverage",
    "ClusterProminence",
    "ClusterShade",
    "ClusterTendency",
    "Contrast",
    "Correlation",
    "DifferenceAverage",
    "DifferenceEntropy",
    "DifferenceVariance",
    "JointEnergy",
    "JointEntropy",
    "Imc1",
    "Imc2",
    "Idm",
    "Idmn",
    "Id",
    "Idn",
    "InverseVariance",
    "MaximumProbability",
    "SumAverage",
    "SumEntropy",
    "SumSquares",
    "MCC",
];

pub const GLRLM: [&str; 16] = [
    "ShortRunEmphasis",
    "LongRunEmphasis",
    "GrayLevelNonUniformity",
    "GrayLevelNonUniformityNormalized",
    "RunLengthNonUniformity",
    "RunLengthNonUniformityNormalized",
    "RunPercentage",
    "GrayLevelVariance",
    "RunVariance",
    "RunEntropy",
    "LowGrayLevelRunEmphasis",
    "HighGrayLevelRunEmphasis",
    "ShortRunLowGrayLevelEmphasis",
    "ShortRunHighGrayLevelEmphasis",
    "LongRunLowGrayLevelEmphasis",
    "LongRunHighGrayLevelEmphasis",
];

pub const GLSZM: [&str; 16] = [
    "SmallAreaEmphasis",
    "LargeAreaEmphasis",
    "GrayLevelNonUniformity",
    "GrayLevelNonUniformityNormalized",
    "SizeZoneNonUniformity",
    "SizeZoneNonUniformityNormalized",
    "ZonePercentage",
    "GrayLevelVariance",
    "ZoneVariance",
    "ZoneEntropy",
    "LowGrayLevelZoneEmphasis",
    "HighGrayLevelZoneEmphasis",
    "SmallAreaLowGrayLevelEmphasis",
    "SmallAreaHighGrayLevelEmphasis",
    "LargeAreaLowGrayLevelEmphasis",
    "LargeAreaHighGrayLevelEmphasis",
];

pub const GLDM: [&str; 14] = [
    "SmallDependenceEmphasis",
    "LargeDependenceEmphasis",
    "GrayLevelNonUniformity",
    "DependenceNonUniformity",
    "DependenceNonUniformityNormalized",
    "GrayLevelVariance",
    "DependenceVariance",
    "DependenceEntropy",
    "LowGrayLevelEmphasis",
    "HighGrayLevelEmphasis",
    "SmallDependenceLowGrayLevelEmphasis",
    "SmallDependenceHighGrayLevelEmphasis",
    "LargeDependenceLowGrayLevelEmphasis",
    "LargeDependenceHighGrayLevelEmphasis",
];

pub const NGTDM: [&str; 5] = ["Coarseness", "Contrast", "Busyness", "Complexity", "Strength"];

/// Feature family, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    FirstOrder,
    Glcm,
    Glrlm,
    Glszm,
    Gldm,
    Ngtdm,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::FirstOrder,
        Family::Glcm,
        Family::Glrlm,
        Family::Glszm,
        Family::Gldm,
        Family::Ngtdm,
    ];

    pub fn prefix(self) -> &'static str {
        match self {
            Family::FirstOrder => "firstorder",
            Family::Glcm => "glcm",
            Family::Glrlm => "glrlm",
            Family::Glszm => "glszm",
            Family::Gldm => "gldm",
            Family::Ngtdm => "ngtdm",
        }
    }

    pub fn names(self) -> &'static [&'static str] {
        match self {
            Family::FirstOrder => &FIRST_ORDER,
            Family::Glcm => &GLCM,
            Family::Glrlm => &GLRLM,
            Family::Glszm => &GLSZM,
            Family::Gldm => &GLDM,
            Family::Ngtdm => &NGTDM,
        }
    }

    /// Column range of this family inside the 93-value vector.
    pub fn range(self) -> std::ops::Range<usize> {
        let mut start = 0;
        for f in Family::ALL {
            let len = f.names().len();
            if f == self {
                return start..start + len;
            }
            start += len;
        }
        unreachable!()
    }
}

pub const FEATURE_COUNT: usize = 93;

static CANONICAL: LazyLock<Vec<String>> = LazyLock::new(|| {
    Family::ALL
        .iter()
        .flat_map(|f| f.names().iter().map(move |n| format!("{}_{n}", f.prefix())))
        .collect()
});

/// The 93 family-prefixed feature names in canonical column order.
pub fn feature_names() -> &'static [String] {
    &CANONICAL
}
