#include "bpsurv/data.hpp"

namespace bpsurv {

namespace {

// Laryngeal cancer study, 90 patients: disease stage (1-4), lifetime in
// months, age at diagnosis, and the failure indicator.
constexpr std::string_view kLarynxCsv = R"(patient,stage,time,age,delta
1,1,0.60,77,1
2,1,1.30,53,1
3,1,2.40,45,1
4,1,2.50,57,0
5,1,3.20,58,1
6,1,3.20,51,0
7,1,3.30,76,1
8,1,3.30,63,0
9,1,3.50,43,1
10,1,3.50,60,1
11,1,4.00,52,1
12,1,4.00,63,1
13,1,4.30,86,1
14,1,4.50,48,0
15,1,4.50,68,0
16,1,5.30,81,1
17,1,5.50,70,0
18,1,5.90,58,0
19,1,5.90,47,0
20,1,6.00,75,1
21,1,6.10,77,0
22,1,6.20,64,0
23,1,6.40,77,1
24,1,6.50,67,1
25,1,6.50,79,0
26,1,6.70,61,0
27,1,7.00,66,0
28,1,7.40,68,1
29,1,7.40,73,0
30,1,8.10,56,0
31,1,8.10,73,0
32,1,9.60,58,0
33,1,10.70,68,0
34,2,0.20,86,1
35,2,1.80,64,1
36,2,2.00,63,1
37,2,2.20,71,0
38,2,2.60,67,0
39,2,3.30,51,0
40,2,6.20,74,1
41,2,7.00,62,1
42,2,7.50,50,0
43,2,7.60,53,0
44,2,9.30,61,0
45,3,0.30,49,1
46,3,0.30,71,1
47,3,0.50,57,1
48,3,0.70,79,1
49,3,0.80,82,1
50,3,1.00,49,1
51,3,1.30,60,1
52,3,1.60,64,1
53,3,1.80,74,1
54,3,1.90,72,1
55,3,1.90,53,1
56,3,3.20,54,1
57,3,3.50,81,1
58,3,3.70,52,0
59,3,4.50,66,0
60,3,4.80,54,0
61,3,4.80,63,0
62,3,5.00,59,1
63,3,5.00,49,0
64,3,5.10,69,0
65,3,6.30,70,1
66,3,6.40,65,1
67,3,6.50,65,0
68,3,7.80,68,1
69,3,8.00,78,0
70,3,9.30,69,0
71,3,10.10,51,0
72,4,0.10,65,1
73,4,0.30,71,1
74,4,0.40,76,1
75,4,0.80,65,1
76,4,0.80,78,1
77,4,1.00,41,1
78,4,1.50,68,1
79,4,4.30,48,0
80,4,3.80,84,1
81,4,3.60,71,1
82,4,2.90,74,0
83,4,2.30,62,1
84,4,2.00,69,1
85,2,4.00,81,1
86,2,4.30,47,0
87,2,4.30,64,0
88,2,5.00,66,0
89,2,3.60,70,1
90,2,3.60,72,0
)";

// Veterans administration lung cancer trial, the 97 patients without prior
// therapy: survival time in days, Karnofsky performance score, and cell type.
constexpr std::string_view kVeteranCsv = R"(patient,time,karno,celltype,delta
1,72,60,squamous,1
2,228,60,squamous,1
3,10,20,squamous,1
4,110,80,squamous,1
5,314,50,squamous,1
6,100,70,squamous,0
7,42,60,squamous,1
8,144,30,squamous,1
9,30,60,small,1
10,384,60,small,1
11,4,40,small,1
12,13,60,small,1
13,123,40,small,0
14,97,60,small,0
15,59,30,small,1
16,117,80,small,1
17,151,50,small,1
18,22,60,small,1
19,18,20,small,1
20,139,80,small,1
21,20,30,small,1
22,31,75,small,1
23,52,70,small,1
24,18,30,small,1
25,51,60,small,1
26,122,80,small,1
27,27,60,small,1
28,54,70,small,1
29,7,50,small,1
30,63,50,small,1
31,392,40,small,1
32,92,70,adeno,1
33,35,40,adeno,1
34,117,80,adeno,1
35,132,80,adeno,1
36,162,80,adeno,1
37,3,30,adeno,1
38,95,80,adeno,1
39,162,80,large,1
40,216,50,large,1
41,553,70,large,1
42,278,60,large,1
43,260,80,large,1
44,156,70,large,1
45,182,90,large,0
46,143,90,large,1
47,105,80,large,1
48,103,80,large,1
49,112,80,squamous,1
50,87,80,squamous,0
51,242,50,squamous,1
52,111,70,squamous,1
53,587,60,squamous,1
54,389,90,squamous,1
55,33,30,squamous,1
56,25,20,squamous,1
57,357,70,squamous,1
58,467,90,squamous,1
59,1,50,squamous,1
60,30,70,squamous,1
61,283,90,squamous,1
62,25,30,small,1
63,21,20,small,1
64,13,30,small,1
65,87,60,small,1
66,7,20,small,1
67,24,60,small,1
68,99,70,small,1
69,8,80,small,1
70,99,85,small,1
71,61,70,small,1
72,25,70,small,1
73,95,70,small,1
74,80,50,small,1
75,29,40,small,1
76,24,40,adeno,1
77,83,99,adeno,0
78,31,80,adeno,1
79,51,60,adeno,1
80,52,60,adeno,1
81,73,60,adeno,1
82,8,50,adeno,1
83,36,70,adeno,1
84,48,10,adeno,1
85,7,40,adeno,1
86,140,70,adeno,1
87,186,90,adeno,1
88,19,50,adeno,1
89,45,40,adeno,1
90,80,40,adeno,1
91,52,60,large,1
92,53,60,large,1
93,15,30,large,1
94,133,75,large,1
95,111,60,large,1
96,378,80,large,1
97,49,30,large,1
)";

}  // namespace

std::string_view fixture_csv(const std::string& name) {
  if (name == "larynx") return kLarynxCsv;
  if (name == "veteran") return kVeteranCsv;
  fail(ErrorCode::MissingColumn, "unknown fixture '" + name + "'");
}

FixtureSpec fixture_default_spec(const std::string& name) {
  if (name == "larynx")
    return {"time", "delta", {{"age", false, ""}, {"stage", true, "1"}}};
  if (name == "veteran")
    return {"time",
            "delta",
            {{"karno", false, ""}, {"celltype", true, "large"}}};
  fail(ErrorCode::MissingColumn, "unknown fixture '" + name + "'");
}

}  // namespace bpsurv
