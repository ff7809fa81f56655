"""Published transition-process and Tracy-Widom quantiles, stored verbatim."""

TRANSITION_QUANTILES_CSV = """\
theta,q0.005,q0.025,q0.05,q0.5,q0.95,q0.975,q0.995
-3.0,-3.85,-3.22,-2.89,-0.96,1.32,1.80,2.78
-2.9,-3.85,-3.22,-2.88,-0.95,1.32,1.80,2.79
-2.8,-3.84,-3.20,-2.86,-0.94,1.33,1.81,2.80
-2.7,-3.83,-3.20,-2.86,-0.93,1.35,1.83,2.82
-2.6,-3.82,-3.19,-2.85,-0.92,1.36,1.85,2.83
-2.5,-3.82,-3.18,-2.84,-0.91,1.38,1.86,2.83
-2.4,-3.80,-3.17,-2.83,-0.89,1.38,1.87,2.85
-2.3,-3.80,-3.16,-2.82,-0.89,1.42,1.91,2.90
-2.2,-3.79,-3.15,-2.82,-0.87,1.42,1.90,2.86
-2.1,-3.77,-3.13,-2.79,-0.85,1.44,1.93,2.94
-2.0,-3.75,-3.12,-2.78,-0.84,1.46,1.95,2.97
-1.9,-3.75,-3.11,-2.77,-0.82,1.49,1.98,2.98
-1.8,-3.74,-3.10,-2.75,-0.80,1.52,2.01,3.03
-1.7,-3.73,-3.09,-2.74,-0.78,1.54,2.03,3.05
-1.6,-3.71,-3.06,-2.72,-0.76,1.57,2.07,3.11
-1.5,-3.69,-3.05,-2.70,-0.74,1.61,2.11,3.14
-1.4,-3.67,-3.03,-2.69,-0.71,1.64,2.14,3.19
-1.3,-3.65,-3.01,-2.66,-0.69,1.68,2.19,3.26
-1.2,-3.64,-2.99,-2.65,-0.66,1.72,2.23,3.27
-1.1,-3.61,-2.97,-2.63,-0.63,1.77,2.29,3.37
-1.0,-3.58,-2.94,-2.59,-0.59,1.83,2.35,3.44
-0.9,-3.57,-2.91,-2.56,-0.56,1.88,2.41,3.52
-0.8,-3.55,-2.89,-2.54,-0.53,1.94,2.48,3.62
-0.7,-3.53,-2.87,-2.51,-0.48,2.01,2.57,3.70
-0.6,-3.51,-2.84,-2.49,-0.44,2.08,2.64,3.79
-0.5,-3.49,-2.82,-2.46,-0.39,2.17,2.74,3.93
-0.4,-3.45,-2.77,-2.42,-0.35,2.27,2.85,4.10
-0.3,-3.41,-2.74,-2.38,-0.28,2.38,2.97,4.25
-0.2,-3.37,-2.70,-2.33,-0.22,2.48,3.09,4.39
-0.1,-3.35,-2.66,-2.30,-0.15,2.61,3.24,4.59
0.0,-3.31,-2.62,-2.25,-0.08,2.75,3.40,4.76
0.1,-3.26,-2.57,-2.20,0.00,2.91,3.57,4.96
0.2,-3.22,-2.52,-2.14,0.09,3.08,3.77,5.24
0.3,-3.17,-2.47,-2.09,0.19,3.25,3.95,5.45
0.4,-3.13,-2.40,-2.02,0.29,3.46,4.19,5.72
0.5,-3.08,-2.34,-1.96,0.41,3.67,4.42,5.99
0.6,-3.01,-2.28,-1.89,0.54,3.90,4.68,6.29
0.7,-2.96,-2.21,-1.80,0.69,4.17,4.96,6.60
0.8,-2.90,-2.14,-1.73,0.83,4.41,5.23,6.91
0.9,-2.81,-2.04,-1.62,1.01,4.73,5.57,7.30
1.0,-2.71,-1.95,-1.53,1.18,5.02,5.88,7.62
1.1,-2.63,-1.86,-1.42,1.39,5.37,6.23,8.01
1.2,-2.56,-1.75,-1.31,1.60,5.69,6.59,8.38
1.3,-2.47,-1.64,-1.18,1.84,6.06,6.96,8.80
1.4,-2.37,-1.52,-1.05,2.10,6.44,7.37,9.22
1.5,-2.25,-1.38,-0.89,2.37,6.82,7.79,9.72
1.6,-2.14,-1.23,-0.73,2.67,7.27,8.22,10.19
1.7,-2.03,-1.08,-0.55,3.00,7.67,8.65,10.66
1.8,-1.88,-0.91,-0.37,3.34,8.12,9.13,11.19
1.9,-1.73,-0.72,-0.14,3.70,8.59,9.62,11.71
2.0,-1.56,-0.53,0.07,4.09,9.09,10.14,12.20
2.1,-1.39,-0.30,0.34,4.50,9.61,10.66,12.84
2.2,-1.21,-0.05,0.62,4.91,10.12,11.20,13.31
2.3,-0.99,0.22,0.92,5.37,10.67,11.75,13.96
2.4,-0.77,0.51,1.24,5.84,11.24,12.36,14.52
2.5,-0.53,0.82,1.59,6.32,11.82,12.94,15.14
2.6,-0.24,1.16,1.96,6.82,12.45,13.57,15.88
2.7,0.04,1.52,2.37,7.35,13.05,14.22,16.52
2.8,0.36,1.91,2.78,7.90,13.68,14.85,17.18
2.9,0.73,2.34,3.23,8.47,14.35,15.55,17.90
3.0,1.08,2.77,3.70,9.04,15.02,16.21,18.60
3.1,1.52,3.27,4.22,9.67,15.71,16.92,19.38
3.2,1.93,3.72,4.72,10.28,16.42,17.63,20.07
3.3,2.41,4.25,5.26,10.93,17.15,18.40,20.85
3.4,2.93,4.79,5.82,11.61,17.91,19.18,21.74
3.5,3.40,5.36,6.41,12.29,18.65,19.93,22.48
3.6,3.96,5.95,7.03,13.01,19.48,20.78,23.37
3.7,4.52,6.59,7.68,13.72,20.26,21.56,24.14
3.8,5.12,7.18,8.30,14.48,21.13,22.47,25.05
3.9,5.76,7.89,9.01,15.25,21.95,23.31,25.98
4.0,6.38,8.57,9.72,16.05,22.83,24.17,26.87
4.1,7.04,9.25,10.41,16.85,23.70,25.06,27.75
4.2,7.70,9.93,11.15,17.68,24.61,25.96,28.68
4.3,8.41,10.69,11.91,18.52,25.55,26.94,29.71
4.4,9.14,11.49,12.73,19.41,26.49,27.88,30.62
4.5,9.93,12.27,13.52,20.28,27.43,28.84,31.60
4.6,10.68,13.09,14.35,21.20,28.43,29.81,32.63
4.7,11.46,13.91,15.19,22.12,29.41,30.84,33.67
4.8,12.23,14.76,16.07,23.06,30.44,31.88,34.68
4.9,13.12,15.63,16.94,24.03,31.52,32.99,35.90
5.0,13.97,16.54,17.87,25.04,32.55,34.02,36.98
5.1,14.88,17.44,18.80,26.04,33.64,35.13,38.05
5.2,15.76,18.39,19.73,27.06,34.74,36.22,39.18
5.3,16.70,19.36,20.71,28.11,35.83,37.34,40.37
5.4,17.67,20.35,21.75,29.19,37.01,38.52,41.57
5.5,18.57,21.35,22.75,30.28,38.14,39.70,42.71
5.6,19.63,22.36,23.78,31.40,39.34,40.91,43.98
5.7,20.67,23.43,24.85,32.54,40.53,42.08,45.15
5.8,21.65,24.46,25.91,33.67,41.72,43.31,46.43
5.9,22.78,25.52,27.00,34.83,42.97,44.54,47.70
6.0,23.82,26.63,28.11,36.03,44.25,45.86,48.95
"""

TRANSITION_QUANTILES_SHA256 = "9ae7d7b6a9735cd39f751f97985e17aaeb923676fe3f69e258d4b257c35f7baf"

TRACY_WIDOM_QUANTILES = {
    0.005: -4.15,
    0.025: -3.52,
    0.05: -3.18,
    0.5: -1.27,
    0.95: 0.98,
    0.975: 1.45,
    0.995: 2.42,
}
