# Figures package initialization
