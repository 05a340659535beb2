"""Sliding-window extraction, labeling, undersampling, and the FFT features
that feed the classifier, on one synthetic animal. Saves a before/after
spectrum figure like the one that motivates transforming to the frequency
domain.

Run:  python demos/02_windows_and_spectra.py
"""

from pathlib import Path

import numpy as np

from seizurekit import SynthConfig, generate, make_windows, transform_set, undersample

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

config = SynthConfig(duration_s=2 * 3600, n_seizures=3, seed=13)
dataset = generate(config)
print(f"synthetic animal: {config.duration_s} s, seizures at "
      f"{[(a.start_unix - 1704067200, a.duration_s) for a in dataset.annotations]}")

windows = make_windows(dataset.ecog, dataset.annotations, window_s=60, stride_s=10)
n_pos = int(windows.labels.sum())
print(f"windows: {windows.n_windows} rows x {windows.window_len_samples} samples, "
      f"{n_pos} positive ({n_pos / windows.n_windows:.1%})")
print(f"window matrix is a view into the recording: {windows.windows.base is not None}")

balanced = undersample(windows, target_neg_per_pos=1.0, seed=0)
print(f"after undersampling: {balanced.n_windows} rows, "
      f"{int(balanced.labels.sum())} positive (1:1 balance; test sets stay imbalanced)")

features = transform_set(balanced)
print(f"spectra: {features.n_windows} rows x {features.series_len} bins, "
      f"resolution {features.bin_hz:.4f} Hz")

pos_row = features.features[balanced.labels == 1][0]
neg_row = features.features[balanced.labels == 0][0]
band = config.ecog_burst_band_hz
lo_bin = int(band[0] / features.bin_hz)
hi_bin = int(band[1] / features.bin_hz)
print(f"mean in-band magnitude ({band[0]:g}-{band[1]:g} Hz): "
      f"seizure {pos_row[lo_bin:hi_bin].mean():.0f} vs background {neg_row[lo_bin:hi_bin].mean():.0f}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    freqs = np.arange(features.series_len) * features.bin_hz
    fig, axes = plt.subplots(2, 2, figsize=(11, 6), sharex="col")
    pos_idx = int(np.flatnonzero(balanced.labels == 1)[0])
    neg_idx = int(np.flatnonzero(balanced.labels == 0)[0])
    t = np.arange(balanced.window_len_samples) / 500.0
    axes[0, 0].plot(t, balanced.windows[neg_idx], lw=0.2)
    axes[0, 0].set_title("background window (time domain)")
    axes[1, 0].plot(t, balanced.windows[pos_idx], lw=0.2, color="tab:red")
    axes[1, 0].set_title("seizure window (time domain)")
    axes[1, 0].set_xlabel("seconds")
    axes[0, 1].semilogy(freqs, neg_row, lw=0.4)
    axes[0, 1].set_title("background spectrum")
    axes[1, 1].semilogy(freqs, pos_row, lw=0.4, color="tab:red")
    axes[1, 1].set_title("seizure spectrum (burst band stands out)")
    axes[1, 1].set_xlabel("Hz")
    fig.tight_layout()
    fig.savefig(OUT / "spectra.png", dpi=110)
    print(f"figure saved to {OUT / 'spectra.png'}")
except ImportError:
    print("matplotlib not installed; skipping the figure")
