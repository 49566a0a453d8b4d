pub mod appendix;
pub mod bethe;
pub mod contour;
pub mod hyp2f1;
pub mod integral;
pub mod master;
