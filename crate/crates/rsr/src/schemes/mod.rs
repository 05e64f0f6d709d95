//! End-to-end demonstrations: RSA-CRT signing with the Bellcore attack
//! oracle, ElGamal decryption with both inverse routines, and Kyber-style
//! key generation with the twiddle-zeroization NTT attack. Each runs
//! unprotected or protected, with or without a fault injector attached.

mod elgamal;
mod kyber;
mod rsa;

pub use elgamal::{elgamal_decrypt, elgamal_encrypt, InverseMethod};
pub use kyber::{
    demo_protection, expand_matrix, flatten_keypair, kyber_keygen, sample_secret_and_error,
    twiddle_zeroization_attack, KyberParams, KyberPublicKey, KyberSecretKey, TwiddleAttackReport,
};
pub use rsa::{
    bellcore_recover_factor, bellcore_recover_factor_from_message, rsa_crt_sign, rsa_verify,
    RsaKey,
};
