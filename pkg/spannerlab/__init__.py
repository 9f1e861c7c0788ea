from spannerlab._version import __version__

defaults = {
    # Constant M_{theta,eps} of the short-edge radius r_eps
    'M': 2.0,
    # Constant K_theta of the far-pair radius R_eps
    'K': 20.0,
    # Cone neighbour used for E2 and CONSTRUCT, 'yao' or 'theta'
    'cone_kind': 'yao',
    # Stretch is verified over all pairs up to this many vertices,
    # above it over a seeded sample of sources
    'stretch_full_limit': 2000,
    'stretch_sample_sources': 200,
    # Width of the stretch histogram buckets
    'histogram_width': 0.01,
    # Absolute tolerance of the ellipse/square area quadrature
    'quadrature_abs_tol': 1e-9,
    # Number of sampled point pairs for the lonely-edge expectation
    'lonely_samples': 100000,
    # Print progress of long running calculations
    'report_progress': True,
    # Number of individual violations reported per diagnostic
    'max_logged_violations': 10,
    # Number of Dijkstra sources handled per call into the kernel
    'apsp_chunk': 64,
}
