from .autoencoder import (AutoencoderSpec, ForwardResult, TrainConfig, forward, init_params,
                          loss_and_grad, mse_loss, noise_std, power_normalize, reconstruct,
                          train_epochs, unpack)
from .data import Dataset, dirichlet_partition, load_tile_corpus, synthetic_tiles
from .metrics import batch_ssim, mse, psnr, psnr_from_mse, ssim

__all__ = [
    "AutoencoderSpec", "Dataset", "ForwardResult", "TrainConfig", "batch_ssim",
    "dirichlet_partition", "forward", "init_params", "load_tile_corpus", "loss_and_grad",
    "mse", "mse_loss", "noise_std", "power_normalize", "psnr", "psnr_from_mse",
    "reconstruct", "ssim", "synthetic_tiles", "train_epochs", "unpack",
]
